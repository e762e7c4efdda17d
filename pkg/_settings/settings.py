import os
from pathlib import Path
from dotenv import load_dotenv


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(os.path.join(BASE_DIR, ".env"))

# The API is a local computation service; the key only signs sessions nobody uses.
SECRET_KEY = os.getenv("SECRET_KEY", "uavcap-insecure-5v#k1q8t@r2m!w0z3e7y9u4i6o")

DEBUG = os.getenv("DEBUG", "True").lower() == "true"

ALLOWED_HOSTS = [host for host in os.getenv("ALLOWED_HOSTS", "localhost,127.0.0.1,0.0.0.0").split(",") if host]


# Application definition

INSTALLED_APPS = [
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "rest_framework",
    "app_capacity",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.middleware.common.CommonMiddleware",
]

ROOT_URLCONF = "_settings.urls"

WSGI_APPLICATION = "_settings.wsgi.application"


# Database
# Nothing is persisted; the sqlite file only backs Django's test runner.

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Internationalization

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# DRF Configuration
REST_FRAMEWORK = {
    "DEFAULT_AUTHENTICATION_CLASSES": [],
    "DEFAULT_PERMISSION_CLASSES": [
        "rest_framework.permissions.AllowAny",
    ],
    "DEFAULT_RENDERER_CLASSES": [
        "rest_framework.renderers.JSONRenderer",
    ],
    "UNAUTHENTICATED_USER": None,
}


def _env_float_pair(name, default):
    raw = os.getenv(name)
    if not raw:
        return default
    low, high = raw.split(",")
    return float(low), float(high)


# Capacity toolkit defaults (scenario values themselves live in scenario files)
UAVCAP = {
    # Scenario file used when a command gets no --config; empty means built-in defaults
    "DEFAULT_CONFIG": os.getenv("UAVCAP_DEFAULT_CONFIG", ""),
    # Search interval for the optimal service height, meters above ground
    "HEIGHT_RANGE_M": _env_float_pair("UAVCAP_HEIGHT_RANGE_M", (1.5, 60.0)),
    # Grid points of the tabulated link-distance PDF written by --dump-pdf
    "PDF_RESOLUTION": int(os.getenv("UAVCAP_PDF_RESOLUTION", "4096")),
    "SIM_SEED": int(os.getenv("UAVCAP_SIM_SEED", "42")),
    "SIM_REPLICATIONS": int(os.getenv("UAVCAP_SIM_REPLICATIONS", "20")),
    "SIM_DROPS": int(os.getenv("UAVCAP_SIM_DROPS", "50000")),
    # Process pool size for sweeps and boundaries; 1 keeps everything in-process
    "WORKERS": int(os.getenv("UAVCAP_WORKERS", "1")),
    # Coarse ell samples used to bracket the airborne/landed crossing per T
    "BOUNDARY_ELL_SAMPLES": int(os.getenv("UAVCAP_BOUNDARY_ELL_SAMPLES", "48")),
}


LOGS_DIR = BASE_DIR / "logs"
os.makedirs(LOGS_DIR, exist_ok=True)

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {filename} {lineno} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "file": {
            "level": "DEBUG",
            "class": "logging.handlers.RotatingFileHandler",
            "filename": LOGS_DIR / "uavcap.log",
            "maxBytes": 1024 * 1024,  # 1MB
            "backupCount": 5,
            "formatter": "verbose",
        },
        "console": {
            "level": os.getenv("UAVCAP_CONSOLE_LOG_LEVEL", "WARNING"),
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "root": {
        "handlers": ["file", "console"],
    },
    "loggers": {
        "django": {
            "handlers": ["file", "console"],
            "level": "INFO",
            "propagate": False,
        },
        "app_capacity": {
            "handlers": ["file", "console"],
            "level": "DEBUG",
            "propagate": False,
        },
    },
}
