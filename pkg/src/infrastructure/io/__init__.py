"""구조/체크포인트 파일 입출력."""
