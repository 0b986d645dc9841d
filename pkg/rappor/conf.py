from django.conf import settings


DEFAULTS = {
    'SEED': 7,
    'N_CLIENTS': 25000,
    'LAMBDA': 0.5,
    'VALUES': [f'v{i}' for i in range(1, 11)],
    'N_TESTS': 40,
    'BATCH_SIZE': 1000,
    'SAMPLE_SIZES': [100, 1000, 10000, 20000, 25000],
    'SWEEP_SIZES': [300, 400, 500, 600],
    'CLIENT_PREFIX': 'client',
    'CLIENT_SECRET': 'ara-rappor-client',
}


def ara_settings(name):
    """Look up a pipeline default from ``settings.ARA``, falling back to DEFAULTS."""
    configured = getattr(settings, 'ARA', {})
    if name in configured:
        return configured[name]
    try:
        return DEFAULTS[name]
    except KeyError:
        raise KeyError(f'Unknown ARA setting {name!r}') from None
