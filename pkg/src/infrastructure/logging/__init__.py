"""로깅 인프라스트럭처 모듈."""
