"""ProteinAE-Desk 에러 계층.

Domain 에러는 입력/계산 규칙 위반, Infra 에러는 설정·파일·저장소 등
기술적 실패를 나타낸다. CLI 종료 코드 매핑은 ``common.exception_mapper`` 참고.
"""


class ProteinAEError(Exception):
    """모든 프로젝트 에러의 베이스 클래스."""


# ============================================================================
# Domain Errors
# ============================================================================

class DomainError(ProteinAEError):
    """도메인 규칙 위반."""


class ValidationError(DomainError):
    """입력 형태/값 검증 실패."""


class InvalidLength(ValidationError):
    """길이 파라미터가 허용 범위를 벗어남."""


class TooShort(ValidationError):
    """구조가 연산에 필요한 최소 길이보다 짧음."""


class OddSize(ValidationError):
    """짝수여야 하는 크기가 홀수임."""


class OddHeadDim(ValidationError):
    """RoPE head 차원이 홀수임."""


class ShapeMismatch(ValidationError):
    """텐서/배열 shape 불일치."""


class ModeMismatch(ValidationError):
    """encoder/decoder 모드와 입력 조합이 맞지 않음."""


class EmptyMask(ValidationError):
    """마스크에 유효 원소가 하나도 없음."""


class RequiresUnitDownsample(ValidationError):
    """잔기 단위 latent가 필요한 연산에 r != 1 체크포인트가 주어짐."""


class StructureError(DomainError):
    """구조 파일/구조 객체 관련 에러."""


class MalformedFile(StructureError):
    """구조 파일 파싱 실패 또는 기하 검증 실패."""


class ChainNotFound(StructureError):
    """요청한 체인이 파일에 없음."""


class EmptyChain(StructureError):
    """완전한 backbone 잔기가 하나도 없음."""


class EmptyOverlap(StructureError):
    """두 구조의 공통 유효 잔기가 없음."""


class EvaluationError(DomainError):
    """평가 지표 계산 불가."""


class InsufficientSamples(EvaluationError):
    """지표 계산에 필요한 샘플 수 부족."""


class EmptyReference(EvaluationError):
    """novelty 계산용 참조 집합이 비어 있음."""


# ============================================================================
# Infrastructure Errors
# ============================================================================

class InfraError(ProteinAEError):
    """기술적 실패 (설정, 파일, 저장소)."""


class ConfigError(InfraError):
    """설정 파일 파싱/검증 실패."""


class DatasetError(InfraError):
    """데이터셋 로딩 실패."""


class EmptyDataset(DatasetError):
    """학습에 사용할 구조가 하나도 없음."""


class CheckpointError(InfraError):
    """체크포인트 읽기/쓰기 실패."""


class CheckpointMismatch(CheckpointError):
    """체크포인트와 설정의 모델 파라미터가 맞지 않음."""


class CacheError(InfraError):
    """latent 캐시 입출력 실패."""
