"""애플리케이션 DTO."""
