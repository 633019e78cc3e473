"""matplotlib 리포트 그림."""
