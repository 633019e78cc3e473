"""ProteinAE 소스 패키지."""
