"""파일 시스템 어댑터."""
