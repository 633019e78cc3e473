"""공통 모듈 (에러 계층, 예외 매퍼)."""
