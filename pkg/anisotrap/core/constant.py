# 파이프라인 단계 이름
DERIVE = "derive"
CLASSIFY = "classify"
BOUNDS = "bounds"
MINIMIZE = "minimize"
DETECT_VORTICES = "detect_vortices"
EMIT = "emit"

# 영역(regime) 태그
WEAK = "Weak"
INTERMEDIATE = "Intermediate"
STRONG = "Strong"

# 트랩 파라미터 기본값
DEFAULT_OMEGA_FLOOR = 1e-3  # ω 하한 (λ, d 공식이 ω로 나눔)
CONSTRAINT_TOL = 1e-12  # ω²+ν²+ε²=1 허용 오차
OVERDETERMINED_TOL = 1e-9  # 세 값을 모두 준 경우 허용 오차
MATRIX_TOL = 1e-10  # 행렬 잔차 기본 허용 오차

# 영역 분류 기준 (κ/ε^{1/3})
REGIME_THRESHOLDS = {"low": 0.3, "high": 3.0}

# 다항식/기저 설정
ENTIRE_DEGREE_CAP = 64  # EntirePoly 최대 차수
FOCK_DEGREE_GUARD = 512  # φ_k 로그 영역 평가 상한
TRUNCATION_LEAK = 1e-3  # |c_N|/max|c_k| 경고 기준

# 격자/해상도 설정
MIN_GRID_POINTS = 8
BOUNDARY_MASS_TOL = 1e-10  # 경계 질량 비율 허용치
KERNEL_ORACLE_MAX_POINTS = 64 * 64  # 커널 오라클 격자 상한
KERNEL_BLOCK_ROWS = 512

# 세타 함수 설정
THETA_TAIL = 37.0  # e^{-37} ≈ 1e-16
TAU_IMAG_MIN = 1e-6
HEXAGONAL_TAU = complex(-0.5, 3**0.5 / 2)
ABRIKOSOV_B = 1.1596
TAU_SCAN_IMAG_MAX = 2.0  # 기본 영역 스캔의 τ_I 상한
TAU_XATOL = 1e-10
TAU_STEP_TOL = 1e-6  # 평평한 최소점에서 Brent 위치 정밀도는 √eps 수준
TAU_MAX_REFINE = 20
TAU_MATCH_TOL = 1e-3  # 육각 격자점/b 값 허용 오차
CELL_QUADRATURE_POINTS = 64
ABRIKOSOV_SKIRT = 1.0  # 창 가장자리(raised-cosine) 폭
ABRIKOSOV_MARGIN = 1.0  # 평탄부에서 잔차 평가 영역까지의 여백
KERNEL_REACH = 2.5  # e^{-π r²/2} 커널이 무시 가능해지는 거리
BASIS_COVERAGE = 1.2  # 강한 영역 기저 x₁ 반축 / 응축체 길이

# 최소화 설정
SOLVER_SETTINGS = {
    "tolerance": 1e-6,  # grad_norm < tol·max(1, E)
    "max_iter": 5000,
    "restarts": 3,
    "initial_step": 1.0,
    "armijo_factor": 0.5,
    "armijo_slope": 1e-4,
    "max_backtracks": 40,
    "min_step": 1e-12,
    "max_step": 1e4,
    "restart_noise": 0.3,
}

# 소용돌이 검출 설정
ZERO_FLOOR = 1e-6
BULK_MARGIN = 0.8
MIN_LATTICE_ZEROS = 6
BOND_CUTOFF = 1.3  # 중앙 최근접 거리 대비 결합 길이 상한
NEWTON_STEPS = 8
NEWTON_TOL = 1e-3  # 마지막 Newton 걸음 상한 (격자 간격 대비)
EDGE_SAMPLES = 16  # 위상 변화가 큰 칸의 변당 재표본 수

# 약한 영역 상계 여유
WEAK_UPPER_SLACK = 0.25

# 출력 포맷 설정
OUTPUT_FORMATS = ("csv", "gnuplot", "json")
FLOAT_FORMAT = "%.12e"
DENSITY_CSV = "density.csv"
DENSITY_GNUPLOT = "density.gnuplot"
ZEROS_JSON = "zeros.json"
REPORT_JSON = "report.json"
MANIFEST_JSON = "manifest.json"

# 종료 코드
EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3
EXIT_IO = 4
