"""애플리케이션 Port 인터페이스."""
