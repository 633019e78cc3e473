"""SQLite 저장소."""
