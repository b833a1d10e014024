from ._pathtrace import (
    App,
    InspectError,
    JoinPoint,
    MalformedPayload,
    PointcutError,
    Response,
    TemplateError,
    base64url_decode,
    base64url_encode,
    decode_page,
    inspect,
    list_components,
    normalize_pointcut,
    parse_template,
    pointcut_matches,
    strip,
)

__all__ = [
    "App",
    "InspectError",
    "JoinPoint",
    "MalformedPayload",
    "PointcutError",
    "Response",
    "TemplateError",
    "base64url_decode",
    "base64url_encode",
    "decode_page",
    "inspect",
    "list_components",
    "normalize_pointcut",
    "parse_template",
    "pointcut_matches",
    "strip",
]
