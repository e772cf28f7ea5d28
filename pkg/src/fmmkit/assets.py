"""Embedded data assets: SMS matrices and SLP program texts.

The decomposition matrices ship as SMS files rather than source literals;
they are parsed on first use and pinned by the checksum table below (see
tests/test_assets.py).  A failed checksum or a failed verification of a
decomposition asset is a packaging error, never something to patch at
runtime.
"""

from __future__ import annotations

import hashlib
from importlib import resources

from .sms import read_sms

__all__ = ["asset_names", "read_asset_text", "load_sms_asset", "load_matrix_asset", "sha256"]

# sha256 of every shipped asset; regenerate with tools/checksums.py
CHECKSUMS = {
    "4x4x4_48_rational-ALT_L.sms": "bee6c4918e14d269cde2936cc1a6c7bc31d13c7cf25f0cd53521759ab7a5ef02",
    "4x4x4_48_rational-ALT_P.sms": "26a3f2f8179b3d7c7e8490bbc1ad476dc180780b3c0cbede49c2633934f5115d",
    "4x4x4_48_rational-ALT_R.sms": "0ea29d949c53f8b40da1e83f5d4f1ec6a8b0796d988823c1195c17f42b4e8aaf",
    "4x4x4_48_rational-CoB_L.slp": "e8ee5e73f559380ba1c94c3424daafd64e5f342de2c0d4126de5a0f1459b8412",
    "4x4x4_48_rational-CoB_L.sms": "1e6646926f879a127a3ddce6bdf213e52bb3c14de6adb7168169c14dca48628d",
    "4x4x4_48_rational-CoB_P.slp": "ee54c08210953af61e5bd473b2910ba6186ad807a4963be66d0ff0c9d759d042",
    "4x4x4_48_rational-CoB_P.sms": "5935d51e452cc41b48a1af366716af32c617c9092d5e59e6a8221690fbffca8e",
    "4x4x4_48_rational-CoB_R.slp": "62ee48be6c5c1bd74badbb4530fb2a38f27cc057592e89c135ead7803525d711",
    "4x4x4_48_rational-CoB_R.sms": "2873a9f467fe5ca73d424d35fcb76a1bb5557ed89258a1d23864a3747e9ed4d2",
    "4x4x4_48_rational-TRILINEAR_L.sms": "df1b89b8511d0223159abf3f25f144e41cf5fda5da554c21321be02054cd8b42",
    "4x4x4_48_rational-TRILINEAR_P.sms": "75f41cce2fb710fbe1263127aab252974d19d0f38ce929c7dd1fa0d2ce3499c6",
    "4x4x4_48_rational-TRILINEAR_R.sms": "e3bf01f5fa01b366311977e1875400ce08900e8a03168ee70cbfeca24d3707b3",
    "4x4x4_48_rational_L.slp": "b68345c7c459afc352bba6b90ade9d04399e961a18085a5a0c9277f8393399fe",
    "4x4x4_48_rational_L.sms": "d0ff3e4165514089d1ab2fdd7af181cb69f1dc983255610973d998343ff8d408",
    "4x4x4_48_rational_P.slp": "b474281601a8ec667cbf9f3e0489c80721d7c1268c26b26b36f195a8718ff918",
    "4x4x4_48_rational_P.sms": "45325c712c555daa254ffcf2e65af4d02b04eb09ab622e7fae5070ecee0e2a6a",
    "4x4x4_48_rational_R.slp": "01eefaae80722215257bbdf68cb759180324afe02d2df1164948b41972095606",
    "4x4x4_48_rational_R.sms": "e3bf01f5fa01b366311977e1875400ce08900e8a03168ee70cbfeca24d3707b3",
    "4x4x4_48_rational_mul.slp": "73f44e96258648cc858c81108ecf5726320443394d066226537ae1c894aaf204",
    "isotropy_2x2_complex_U.sms": "d9fd6afca01acb151b0caf257eed60f82b62d6622c7eb2822a4de46aa4ac84e8",
    "isotropy_2x2_complex_V.sms": "a01cdadfb205f97d1069a2f8f7234fde6e0df92c4007a5759eec3ec15c28eebf",
    "isotropy_2x2_complex_W.sms": "a01cdadfb205f97d1069a2f8f7234fde6e0df92c4007a5759eec3ec15c28eebf",
    "isotropy_4x4_complexifier_U.sms": "d8df373c7260943e386f97ad52249b4fddd9ff389131374e50cdb6d6e762ace8",
    "isotropy_4x4_complexifier_V.sms": "c342cc61573d10d25c449252b30dce03e83cc4c924d8575aca1fee632dc4e741",
    "isotropy_4x4_complexifier_W.sms": "f566a8f0b18259c79de4891ee2dda32773c8c894f0f4143c72f0c8aee9c3415f",
    "strassen_L.sms": "8be1819c4b562e6aafd0180df57ce8271890db0958a630c34b3438307c34c48a",
    "strassen_P.sms": "b4646611f53345a2634f7ee1e925bb38c279e8703b6bff60c04c8f5cf6dc44eb",
    "strassen_R.sms": "1be5224ce16f2dbf51b623b947ead8d8b273ba63832aa072f27727a1fed3f532",
}


def _data_root():
    return resources.files("fmmkit") / "data"


def asset_names():
    return sorted(p.name for p in _data_root().iterdir() if p.name.endswith((".sms", ".slp")))


def read_asset_text(name):
    path = _data_root() / name
    if not path.is_file():
        raise FileNotFoundError(f"no embedded asset {name!r}; available: {', '.join(asset_names())}")
    return path.read_text()


def sha256(name):
    return hashlib.sha256(read_asset_text(name).encode()).hexdigest()


def load_sms_asset(name, allow_complex=False):
    return read_sms(read_asset_text(name).splitlines(), allow_complex=allow_complex)


def load_matrix_asset(name, ring=None, allow_complex=False):
    return load_sms_asset(name, allow_complex=allow_complex).to_matrix(ring)
