from __future__ import annotations

import unittest

from pebblekit.models import (
    CoverRule,
    Family,
    GameSemantics,
    InvalidInstanceError,
    ParityRule,
    Quantifier,
)
from pebblekit.utils import (
    all_semantics,
    parse_families,
    parse_family,
    parse_n_range,
    parse_semantics,
    sanitize_path_segment,
)


class UtilsTests(unittest.TestCase):
    def test_sanitize_path_segment(self) -> None:
        self.assertEqual(
            sanitize_path_segment("star 4/resting", "x"), "star-4-resting"
        )
        self.assertEqual(sanitize_path_segment("", "fallback"), "fallback")
        self.assertEqual(sanitize_path_segment("///", "fallback"), "fallback")

    def test_parse_n_range(self) -> None:
        self.assertEqual(parse_n_range("1..4"), range(1, 5))
        self.assertEqual(parse_n_range(" 3 "), range(3, 4))
        with self.assertRaises(InvalidInstanceError):
            parse_n_range("4..1")
        with self.assertRaises(InvalidInstanceError):
            parse_n_range("one..two")

    def test_parse_family(self) -> None:
        self.assertIs(parse_family("star_of_stars"), Family.STAR_OF_STARS)
        self.assertIs(parse_family(" Comb "), Family.COMB)
        with self.assertRaisesRegex(InvalidInstanceError, "known"):
            parse_family("caterpillar")

    def test_parse_families(self) -> None:
        self.assertEqual(parse_families("all"), list(Family))
        self.assertEqual(
            parse_families("comb, bistar"), [Family.COMB, Family.BISTAR]
        )

    def test_all_semantics(self) -> None:
        readings = all_semantics()
        self.assertEqual(len(readings), 8)
        self.assertEqual(len({r.slug for r in readings}), 8)
        self.assertEqual(readings[0], GameSemantics())
        self.assertEqual(readings[0].slug, "resting-initial-exact")

    def test_parse_semantics(self) -> None:
        self.assertEqual(
            parse_semantics("must-receive-always-at-least"),
            GameSemantics(
                CoverRule.MUST_RECEIVE,
                ParityRule.ALWAYS,
                Quantifier.ALL_SIZES_AT_LEAST,
            ),
        )
        with self.assertRaises(InvalidInstanceError):
            parse_semantics("resting")


if __name__ == "__main__":  # pragma: no cover
    unittest.main()
