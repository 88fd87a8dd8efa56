import pkgutil
import re
from pathlib import Path

import wavetails

DOCS_DIRECTORY = Path(__file__).resolve().parents[1] / "docs"
PACKAGES_WITH_CODE = {
    "wavetails.operations",
    "wavetails.simulations",
    "wavetails.sweeps",
}


def get_package_modules() -> set[str]:
    return {
        info.name
        for info in pkgutil.walk_packages(
            wavetails.__path__, prefix="wavetails."
        )
        if not info.ispkg or info.name in PACKAGES_WITH_CODE
    }


def test_api_reference_lists_every_module():
    text = (DOCS_DIRECTORY / "modules.rst").read_text()
    documented = set(re.findall(r"^\.\. automodule:: (\S+)$", text, re.M))

    assert documented == get_package_modules()


def test_index_links_the_api_reference():
    text = (DOCS_DIRECTORY / "index.rst").read_text()

    assert "   modules" in text
    assert (DOCS_DIRECTORY / "modules.rst").exists()
