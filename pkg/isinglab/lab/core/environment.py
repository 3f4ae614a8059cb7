import logging
from datetime import datetime, timezone

import jinja2

from .filters import filter_pm, filter_sci, filter_status

logger = logging.getLogger(__name__)


def build_environment(
    package: str = "isinglab", directory: str = "templates"
) -> jinja2.Environment:
    """Jinja2 environment for run summaries.

    Templates ship inside the package; summaries are Markdown, so nothing is
    autoescaped.
    """
    env = jinja2.Environment(
        loader=jinja2.PackageLoader(package, directory),
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
        undefined=jinja2.StrictUndefined,
        autoescape=False,
    )
    env.globals.update({"now": lambda: datetime.now(timezone.utc)})
    env.filters.update(
        {
            "sci": filter_sci,
            "pm": filter_pm,
            "status": filter_status,
        }
    )
    return env


def render_summary(context: dict, template: str = "summary.md.j2") -> str:
    env = build_environment()
    try:
        return env.get_template(template).render(**context)
    except jinja2.TemplateNotFound:
        logger.error(f"Summary template not found: {template}")
        raise
