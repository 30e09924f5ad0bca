//! Fractions from the source computations, typed in by hand. Nothing here
//! reads the expected blocks of the scenario files.

/// Global lower bound over all cases.
pub const GLOBAL: &str = "132/131";

pub const TABLE: &[(&str, &[(&str, &str)])] = &[
    (
        "smoothQ-onQ",
        &[
            ("s_divisor", "37/44"),
            ("divisor_term", "44/37"),
            ("L.s_curve", "69/88"),
            ("L.curve_term", "88/69"),
            ("L.generic.s_point", "69/88"),
            ("L.generic.f_term", "0"),
            ("L.generic.point_term", "88/69"),
            ("delta", "44/37"),
        ],
    ),
    (
        "smoothQ-onQ-andE",
        &[
            ("s_divisor", "37/44"),
            ("L.s_curve", "69/88"),
            ("L.onE.f_term", "1/11"),
            ("L.onE.point_term", "8/7"),
            ("delta", "8/7"),
        ],
    ),
    (
        "coneQ-vertex",
        &[
            ("divisor_term", "11/10"),
            ("L.curve_term", "44/23"),
            ("L.generic.point_term", "44/23"),
            ("F.curve_term", "11/10"),
            ("F.generic.s_point", "23/88"),
            ("F.generic.point_term", "88/23"),
            ("F.a1.point_term", "44/23"),
            ("F.onEll.s_point", "23/44"),
            ("F.onEll.point_term", "44/23"),
            ("F.onConic.s_point", "37/44"),
            ("F.onConic.point_term", "44/37"),
            ("delta", "11/10"),
        ],
    ),
    (
        "coneQ-offVertex",
        &[
            ("divisor_term", "44/23"),
            ("F.curve_term", "8/7"),
            ("F.generic.point_term", "22/15"),
            ("F.qC.f_term", "13/44"),
            ("F.qC.point_term", "44/43"),
            ("F.qL.f_term", "1/66"),
            ("F.qL.point_term", "33/23"),
            ("delta", "44/43"),
        ],
    ),
    (
        "nodal",
        &[
            ("s_divisor", "14/33"),
            ("G.s_curve", "161/88"),
            ("G.curve_term", "176/161"),
            ("G.onC.s_point", "161/176"),
            ("G.generic.s_point", "69/88"),
            ("delta", "176/161"),
        ],
    ),
    (
        "cusp",
        &[
            ("s_divisor", "14/33"),
            ("G.s_curve", "207/44"),
            ("G.curve_term", "220/207"),
            ("G.qC.f_term", "23/88"),
            ("G.generic.point_term", "88/23"),
            ("G.p0.point_term", "44/23"),
            ("G.qC.point_term", "44/23"),
            ("G.p1.point_term", "88/69"),
            ("delta", "220/207"),
        ],
    ),
    (
        "eckardt",
        &[
            ("s_divisor", "51/22"),
            ("divisor_term", "22/17"),
            ("L.curve_term", "44/23"),
            ("L.generic.s_point", "23/44"),
            ("L.onZ.s_point", "17/22"),
            ("delta", "22/17"),
        ],
    ),
    (
        "onE-onQ",
        &[
            ("s_divisor", "23/44"),
            ("divisor_term", "44/23"),
            ("E1.s_curve", "65/66"),
            ("E1.onQ.f_term", "5/33"),
            ("E1.onQ.s_point", "131/132"),
            ("delta", "132/131"),
        ],
    ),
    (
        "onE-offQ",
        &[
            ("E1.s_curve", "65/66"),
            ("E1.offQ.f_term", "0"),
            ("E1.offQ.s_point", "37/44"),
            ("delta", "66/65"),
        ],
    ),
];
