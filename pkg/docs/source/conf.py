"""Sphinx configuration file for the ideatopic documentation.

The landing page includes the README.md file in the root of the repository,
with GitHub markdown alerts turned into MyST admonitions.
"""

from __future__ import annotations

import sys
from pathlib import Path

package_path = Path("../..").resolve()
sys.path.insert(0, str(package_path))

import ideatopic  # noqa: E402

project = "ideatopic"
copyright = "2026, the ideatopic developers"  # noqa: A001
author = "the ideatopic developers"

version = ideatopic.__version__
release = ideatopic.__version__

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "myst_parser",
    "sphinx_autodoc_typehints",
]

myst_heading_anchors = 3
source_suffix = [".rst", ".md"]
master_doc = "index"
language = "en"
pygments_style = "sphinx"
html_theme = "furo"
htmlhelp_basename = "ideatopicdoc"
default_role = "autolink"
intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
}

_ALERTS = {"IMPORTANT": "important", "NOTE": "note", "TIP": "tip", "WARNING": "caution"}


def change_alerts_to_admonitions(text: str) -> str:
    """Turn `> [!NOTE]` blocks into MyST admonitions."""
    edited: list[str] = []
    current = None
    for line in text.split("\n"):
        marker = next((m for m in _ALERTS if line.strip() == f"> [!{m}]"), None)
        if marker is not None:
            current = marker
            edited.append("```{" + _ALERTS[marker] + "}")
        elif current and not line.strip().startswith(">"):
            edited.extend(["```", line])
            current = None
        elif current:
            edited.append(line.lstrip("> ").rstrip())
        else:
            edited.append(line)
    return "\n".join(edited)


def write_index(readme: Path, source: Path) -> None:
    """Write `introduction.md` from the README and an index pointing at it."""
    intro = change_alerts_to_admonitions(readme.read_text(encoding="utf-8"))
    (source / "introduction.md").write_text(intro, encoding="utf-8")
    (source / "index.md").write_text(
        "```{include} introduction.md\n```\n\n"
        "```{toctree}\n:hidden: true\n:maxdepth: 2\n\nreference/index\n```\n",
        encoding="utf-8",
    )


write_index(package_path / "README.md", Path(__file__).parent)
