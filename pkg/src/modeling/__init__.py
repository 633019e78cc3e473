"""신경망 모듈과 flow 연산 (torch)."""
