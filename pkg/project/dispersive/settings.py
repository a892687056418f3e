"""
Django settings for dispersive project.

The project has no database, templates or URLs: it is driven through
management commands (see README.md). Numeric defaults used by the apps
live at the bottom of this file.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.0/ref/settings/
"""
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    'DISPERSIVE_SECRET_KEY',
    'django-insecure-0s3k(dispersive)-numerics-only-no-sessions-or-auth',
)

DEBUG = os.environ.get('DISPERSIVE_DEBUG', '0') == '1'

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    'rest_framework',

    'grid',
    'lorentz',
    'spectral',
    'propagator',
    'nls',
    'wiener',
]

# No persistence: every run writes CSV/JSON artifacts instead.
DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Library version echoed into every JSON report
VERSION = '0.1.0'

# Output files
OUTPUT_DIR = os.environ.get('DISPERSIVE_OUTPUT_DIR', '../results/')
CSV_FLOAT_FORMAT = '%.17g'

# Grid defaults
GRID_X_MAX = 40.0
GRID_POINTS = 4001
BOUNDARY_TOLERANCE = 1e-10
BOUNDARY_FRACTION = 0.05
DECAY_TOLERANCE = 1e-8

# Decay scans: padding per unit time and the weak-Lp exponent of the CSV column
DECAY_SPREAD = 16.0
DECAY_WEAK_P = 4.0
DECAY_SLOPE_TOLERANCE = 0.05

# Semi-infinite kernel integrals (Gauss-Laguerre)
LAGUERRE_ORDER = 64
LAGUERRE_MAX_ORDER = 1024
LAGUERRE_TOLERANCE = 1e-8

# Spectral propagation: truncated lambda window
SPECTRAL_LAMBDA_MAX = 12.0
SPECTRAL_LAMBDA_STEP = 0.025
SPECTRAL_CHUNK = 256

# Two-delta oscillatory integral (Filon)
TWO_DELTA_TOLERANCE = 1e-4
TWO_DELTA_XI_MAX = 4096.0

# Weak-Lp Picard solver
DUHAMEL_QUAD_POINTS = 16
PICARD_MAX_ITERS = 50
PICARD_TOL = 1e-10
PICARD_DIVERGENCE_STREAK = 3
# geometric time grid standing in for the sup over t
NLS_T_MIN = 0.05
NLS_T_MAX = 2.0
NLS_TIMES = 8
NLS_TARGET_BUDGET = 0.5

# Wiener algebra solver
WIENER_GAUSS_ORDER = 16
WIENER_PRUNE = 1e-14
WIENER_ATOM_CAP = 4096
WIENER_MERGE_DECIMALS = 12
WIENER_PANELS = 32
WIENER_TOL = 1e-12
WIENER_GALERKIN_MODES = 16

# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': True,
    'formatters': {
        'verbose': {
            'format': '%(levelname)s %(asctime)s %(module)s '
                      '%(process)d %(thread)d %(message)s'
        },
        'simple': {
            'format': '%(levelname)s %(message)s'
        },
    },
    'handlers': {
        'null': {
            'level': 'DEBUG',
            'class': 'logging.NullHandler',
        },
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'simple'
        },
    },
    'loggers': {
        'django': {
            'level': 'WARNING',
            'handlers': ['console'],
            'propagate': True,
        },
        'grid': {
            'level': os.environ.get('DISPERSIVE_LOG_LEVEL', 'INFO'),
            'handlers': ['console'],
            'propagate': False,
        },
        'lorentz': {
            'level': os.environ.get('DISPERSIVE_LOG_LEVEL', 'INFO'),
            'handlers': ['console'],
            'propagate': False,
        },
        'spectral': {
            'level': os.environ.get('DISPERSIVE_LOG_LEVEL', 'INFO'),
            'handlers': ['console'],
            'propagate': False,
        },
        'propagator': {
            'level': os.environ.get('DISPERSIVE_LOG_LEVEL', 'INFO'),
            'handlers': ['console'],
            'propagate': False,
        },
        'nls': {
            'level': os.environ.get('DISPERSIVE_LOG_LEVEL', 'INFO'),
            'handlers': ['console'],
            'propagate': False,
        },
        'wiener': {
            'level': os.environ.get('DISPERSIVE_LOG_LEVEL', 'INFO'),
            'handlers': ['console'],
            'propagate': False,
        },
    }
}

# REST framework settings (serializers only, no API views)
REST_FRAMEWORK = {
    'COERCE_DECIMAL_TO_STRING': False,
    'UNAUTHENTICATED_USER': None,
}
