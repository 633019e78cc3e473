"""도메인 서비스 (기하, 합성 구조, 구조 지표)."""
