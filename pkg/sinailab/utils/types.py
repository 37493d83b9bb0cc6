from typing import List, Optional

import numpy as np

_TRUE = ("y", "yes", "t", "true", "on", "1")
_FALSE = ("n", "no", "f", "false", "off", "0")


def str2bool(value: str) -> bool:
    value = value.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ValueError(f"invalid truth value {value!r}")


def remove_parenthesis(value: str):
    value = value.strip()
    if value.startswith("(") and value.endswith(")"):
        value = value[1:-1]
    elif value.startswith("[") and value.endswith("]"):
        value = value[1:-1]
    return value


def int_or_none(value: str) -> Optional[int]:
    """int_or_none.

    Examples:
        >>> import argparse
        >>> parser = argparse.ArgumentParser()
        >>> _ = parser.add_argument('--foo', type=int_or_none)
        >>> parser.parse_args(['--foo', '456'])
        Namespace(foo=456)
        >>> parser.parse_args(['--foo', 'none'])
        Namespace(foo=None)

    """
    if value.strip().lower() in ("none", "null", "nil"):
        return None
    return int(value)


def float_or_none(value: str) -> Optional[float]:
    """float_or_none.

    Examples:
        >>> import argparse
        >>> parser = argparse.ArgumentParser()
        >>> _ = parser.add_argument('--foo', type=float_or_none)
        >>> parser.parse_args(['--foo', '4.5'])
        Namespace(foo=4.5)
        >>> parser.parse_args(['--foo', 'nil'])
        Namespace(foo=None)

    """
    if value.strip().lower() in ("none", "null", "nil"):
        return None
    return float(value)


def sci_int(value) -> int:
    """Integer that also accepts scientific notation.

    Examples:
        >>> sci_int('1e5')
        100000
        >>> sci_int('250')
        250

    """
    number = float(value)
    if not number.is_integer():
        raise ValueError(f"{value!r} is not an integer count")
    return int(number)


def float_range(value) -> List[float]:
    """Parse `start:stop:step` (stop included) or a comma separated list.

    Examples:
        >>> float_range('1:2:0.5')
        [1.0, 1.5, 2.0]
        >>> float_range('[2, 4,8]')
        [2.0, 4.0, 8.0]
        >>> float_range('3')
        [3.0]

    """
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    if isinstance(value, (int, float)):
        return [float(value)]
    value = remove_parenthesis(value)
    if ":" in value:
        parts = value.split(":")
        if len(parts) != 3:
            raise ValueError(f"range {value!r} must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"range {value!r} is empty or has a non-positive step")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 12) for k in range(n)]
    return [float(v) for v in value.split(",") if v.strip() != ""]
