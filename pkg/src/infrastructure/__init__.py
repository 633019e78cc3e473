"""인프라스트럭처 계층 모듈."""
