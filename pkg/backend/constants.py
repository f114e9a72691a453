# backend/constants.py

COMMANDS = [
    'marked-dist', 'fix-window', 'hb-dist',
    'ca-apply', 'ca-compose', 'ca-synthesize',
    'lin-decide', 'lin-inverse', 'stable-finite',
    'surj-1d', 'inj-1d', 'gromov-radius', 'transfer-check', 'converge',
    'eca-sweep', 'psi-bounds',
]

OUTPUT_FORMATS = ['table', 'json', 'csv']

# exit status
EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_PARSE_ERROR = 2
EXIT_RESOURCE_CAP = 3

# HTTP status per exit status
HTTP_STATUS = {
    EXIT_DOMAIN_ERROR: 422,
    EXIT_PARSE_ERROR: 400,
    EXIT_RESOURCE_CAP: 413,
}

# Ψ 경계 sweep 의 기본 군: 2ℤ, 3ℤ, 4ℤ, 6ℤ, 8ℤ, {0}
PSI_DEFAULT_GROUPS = ['cyclic:2', 'cyclic:3', 'cyclic:4', 'cyclic:6', 'cyclic:8', 'free:1']
