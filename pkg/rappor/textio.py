from contextlib import contextmanager, nullcontext
from pathlib import Path


@contextmanager
def open_text(target, mode='r'):
    """Yield a text stream for a path, or pass an already open stream through.

    Files are UTF-8 with LF line endings on every platform.
    """
    if isinstance(target, (str, Path)):
        with open(target, mode, encoding='utf-8', newline='') as stream:
            yield stream
    else:
        with nullcontext(target) as stream:
            yield stream


def source_name(target):
    return str(target) if isinstance(target, (str, Path)) else getattr(target, 'name', None)
