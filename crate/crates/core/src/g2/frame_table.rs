//! Coefficients of the normalised adapted coframe of `D = span{∂_q, ∂_x + p∂_y + q∂_p + F∂_z}`.
//!
//! Each coefficient is a polynomial in the coordinates and the partial
//! derivatives of `F`, divided by `denom · F_qq^fqq_power`. A term
//! `(c, e, ds)` stands for `c · x^e0 y^e1 z^e2 p^e3 q^e4 · Π_{d ∈ ds} ∂^d F`,
//! where `∂^d` differentiates `d[i]` times in the `i`-th coordinate.

pub(super) struct Coefficient {
    pub denom: i64,
    pub fqq_power: u32,
    pub terms: &'static [(i64, [u8; 5], &'static [[u8; 5]])],
}

pub(super) const V1: Coefficient = Coefficient {
    denom: 3,
    fqq_power: 1,
    terms: &[
        (-1, [0, 0, 0, 0, 0], &[[1, 0, 0, 0, 2]]),
        (1, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 2], [0, 0, 1, 0, 0]]),
        (-1, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 0], [0, 0, 1, 0, 2]]),
        (-1, [0, 0, 0, 0, 1], &[[0, 0, 0, 1, 2]]),
        (-1, [0, 0, 0, 1, 0], &[[0, 1, 0, 0, 2]]),
    ],
};

pub(super) const V2: Coefficient = Coefficient {
    denom: 3,
    fqq_power: 1,
    terms: &[(1, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 3]])],
};

pub(super) const W2: Coefficient = Coefficient {
    denom: 30,
    fqq_power: 2,
    terms: &[
        (1, [0, 0, 0, 0, 0], &[[1, 0, 0, 0, 2], [1, 0, 0, 0, 2]]),
        (3, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 3], [2, 0, 0, 0, 1]]),
        (-3, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 3], [1, 0, 0, 1, 0]]),
        (3, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 3], [0, 1, 0, 0, 0]]),
        (
            3,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 3], [0, 0, 1, 0, 1], [1, 0, 0, 0, 0]],
        ),
        (
            -6,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 3], [0, 0, 1, 0, 0], [1, 0, 0, 0, 1]],
        ),
        (
            3,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 3], [0, 0, 0, 1, 0], [0, 0, 1, 0, 0]],
        ),
        (-3, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 2], [2, 0, 0, 0, 2]]),
        (9, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 2], [1, 0, 0, 1, 1]]),
        (18, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 2], [0, 1, 0, 0, 1]]),
        (
            -3,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 2], [0, 0, 1, 0, 2], [1, 0, 0, 0, 0]],
        ),
        (
            -9,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 2], [0, 0, 1, 0, 1], [1, 0, 0, 0, 1]],
        ),
        (
            4,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 2], [0, 0, 1, 0, 0], [1, 0, 0, 0, 2]],
        ),
        (-9, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 2], [0, 0, 0, 2, 0]]),
        (
            -9,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 2], [0, 0, 0, 1, 1], [0, 0, 1, 0, 0]],
        ),
        (
            18,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 2], [0, 0, 0, 1, 0], [0, 0, 1, 0, 1]],
        ),
        (
            3,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 2], [0, 0, 0, 0, 2], [1, 0, 1, 0, 0]],
        ),
        (
            -2,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 2],
                [0, 0, 0, 0, 2],
                [0, 0, 1, 0, 0],
                [0, 0, 1, 0, 0],
            ],
        ),
        (
            -3,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 1], [0, 0, 0, 0, 3], [1, 0, 1, 0, 0]],
        ),
        (
            3,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 1],
                [0, 0, 0, 0, 3],
                [0, 0, 1, 0, 0],
                [0, 0, 1, 0, 0],
            ],
        ),
        (
            9,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 1], [0, 0, 0, 0, 2], [1, 0, 1, 0, 1]],
        ),
        (
            -18,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 1], [0, 0, 0, 0, 2], [0, 0, 1, 1, 0]],
        ),
        (
            9,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 1],
                [0, 0, 0, 0, 2],
                [0, 0, 1, 0, 0],
                [0, 0, 1, 0, 1],
            ],
        ),
        (
            -9,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 1],
                [0, 0, 0, 0, 1],
                [0, 0, 0, 0, 2],
                [0, 0, 2, 0, 0],
            ],
        ),
        (
            2,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 0], [0, 0, 1, 0, 2], [1, 0, 0, 0, 2]],
        ),
        (
            6,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 0], [0, 0, 0, 0, 3], [1, 0, 1, 0, 1]],
        ),
        (
            -3,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 0], [0, 0, 0, 0, 3], [0, 0, 1, 1, 0]],
        ),
        (
            -3,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 0],
                [0, 0, 0, 0, 3],
                [0, 0, 1, 0, 0],
                [0, 0, 1, 0, 1],
            ],
        ),
        (
            -6,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 0], [0, 0, 0, 0, 2], [1, 0, 1, 0, 2]],
        ),
        (
            9,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 0], [0, 0, 0, 0, 2], [0, 0, 1, 1, 1]],
        ),
        (
            -9,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 0],
                [0, 0, 0, 0, 2],
                [0, 0, 1, 0, 1],
                [0, 0, 1, 0, 1],
            ],
        ),
        (
            1,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 0],
                [0, 0, 0, 0, 2],
                [0, 0, 1, 0, 0],
                [0, 0, 1, 0, 2],
            ],
        ),
        (
            3,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 0],
                [0, 0, 0, 0, 2],
                [0, 0, 0, 0, 2],
                [0, 0, 2, 0, 0],
            ],
        ),
        (
            -3,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 0],
                [0, 0, 0, 0, 1],
                [0, 0, 0, 0, 3],
                [0, 0, 2, 0, 0],
            ],
        ),
        (
            9,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 0],
                [0, 0, 0, 0, 1],
                [0, 0, 0, 0, 2],
                [0, 0, 2, 0, 1],
            ],
        ),
        (
            1,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 0],
                [0, 0, 0, 0, 0],
                [0, 0, 1, 0, 2],
                [0, 0, 1, 0, 2],
            ],
        ),
        (
            3,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 0],
                [0, 0, 0, 0, 0],
                [0, 0, 0, 0, 3],
                [0, 0, 2, 0, 1],
            ],
        ),
        (
            -3,
            [0, 0, 0, 0, 0],
            &[
                [0, 0, 0, 0, 0],
                [0, 0, 0, 0, 0],
                [0, 0, 0, 0, 2],
                [0, 0, 2, 0, 2],
            ],
        ),
        (2, [0, 0, 0, 0, 1], &[[0, 0, 0, 1, 2], [1, 0, 0, 0, 2]]),
        (6, [0, 0, 0, 0, 1], &[[0, 0, 0, 0, 3], [1, 0, 0, 1, 1]]),
        (3, [0, 0, 0, 0, 1], &[[0, 0, 0, 0, 3], [0, 1, 0, 0, 1]]),
        (-3, [0, 0, 0, 0, 1], &[[0, 0, 0, 0, 3], [0, 0, 0, 2, 0]]),
        (
            -6,
            [0, 0, 0, 0, 1],
            &[[0, 0, 0, 0, 3], [0, 0, 0, 1, 1], [0, 0, 1, 0, 0]],
        ),
        (
            3,
            [0, 0, 0, 0, 1],
            &[[0, 0, 0, 0, 3], [0, 0, 0, 1, 0], [0, 0, 1, 0, 1]],
        ),
        (-6, [0, 0, 0, 0, 1], &[[0, 0, 0, 0, 2], [1, 0, 0, 1, 2]]),
        (-3, [0, 0, 0, 0, 1], &[[0, 0, 0, 0, 2], [0, 1, 0, 0, 2]]),
        (9, [0, 0, 0, 0, 1], &[[0, 0, 0, 0, 2], [0, 0, 0, 2, 1]]),
        (
            4,
            [0, 0, 0, 0, 1],
            &[[0, 0, 0, 0, 2], [0, 0, 0, 1, 2], [0, 0, 1, 0, 0]],
        ),
        (
            -9,
            [0, 0, 0, 0, 1],
            &[[0, 0, 0, 0, 2], [0, 0, 0, 1, 1], [0, 0, 1, 0, 1]],
        ),
        (
            -3,
            [0, 0, 0, 0, 1],
            &[[0, 0, 0, 0, 2], [0, 0, 0, 1, 0], [0, 0, 1, 0, 2]],
        ),
        (
            3,
            [0, 0, 0, 0, 1],
            &[[0, 0, 0, 0, 2], [0, 0, 0, 0, 2], [0, 0, 1, 1, 0]],
        ),
        (
            -3,
            [0, 0, 0, 0, 1],
            &[[0, 0, 0, 0, 1], [0, 0, 0, 0, 3], [0, 0, 1, 1, 0]],
        ),
        (
            9,
            [0, 0, 0, 0, 1],
            &[[0, 0, 0, 0, 1], [0, 0, 0, 0, 2], [0, 0, 1, 1, 1]],
        ),
        (
            2,
            [0, 0, 0, 0, 1],
            &[[0, 0, 0, 0, 0], [0, 0, 0, 1, 2], [0, 0, 1, 0, 2]],
        ),
        (
            6,
            [0, 0, 0, 0, 1],
            &[[0, 0, 0, 0, 0], [0, 0, 0, 0, 3], [0, 0, 1, 1, 1]],
        ),
        (
            -6,
            [0, 0, 0, 0, 1],
            &[[0, 0, 0, 0, 0], [0, 0, 0, 0, 2], [0, 0, 1, 1, 2]],
        ),
        (1, [0, 0, 0, 0, 2], &[[0, 0, 0, 1, 2], [0, 0, 0, 1, 2]]),
        (3, [0, 0, 0, 0, 2], &[[0, 0, 0, 0, 3], [0, 0, 0, 2, 1]]),
        (-3, [0, 0, 0, 0, 2], &[[0, 0, 0, 0, 2], [0, 0, 0, 2, 2]]),
        (2, [0, 0, 0, 1, 0], &[[0, 1, 0, 0, 2], [1, 0, 0, 0, 2]]),
        (6, [0, 0, 0, 1, 0], &[[0, 0, 0, 0, 3], [1, 1, 0, 0, 1]]),
        (-3, [0, 0, 0, 1, 0], &[[0, 0, 0, 0, 3], [0, 1, 0, 1, 0]]),
        (
            3,
            [0, 0, 0, 1, 0],
            &[[0, 0, 0, 0, 3], [0, 0, 1, 0, 1], [0, 1, 0, 0, 0]],
        ),
        (
            -6,
            [0, 0, 0, 1, 0],
            &[[0, 0, 0, 0, 3], [0, 0, 1, 0, 0], [0, 1, 0, 0, 1]],
        ),
        (-6, [0, 0, 0, 1, 0], &[[0, 0, 0, 0, 2], [1, 1, 0, 0, 2]]),
        (9, [0, 0, 0, 1, 0], &[[0, 0, 0, 0, 2], [0, 1, 0, 1, 1]]),
        (
            -3,
            [0, 0, 0, 1, 0],
            &[[0, 0, 0, 0, 2], [0, 0, 1, 0, 2], [0, 1, 0, 0, 0]],
        ),
        (
            -9,
            [0, 0, 0, 1, 0],
            &[[0, 0, 0, 0, 2], [0, 0, 1, 0, 1], [0, 1, 0, 0, 1]],
        ),
        (
            4,
            [0, 0, 0, 1, 0],
            &[[0, 0, 0, 0, 2], [0, 0, 1, 0, 0], [0, 1, 0, 0, 2]],
        ),
        (
            3,
            [0, 0, 0, 1, 0],
            &[[0, 0, 0, 0, 2], [0, 0, 0, 0, 2], [0, 1, 1, 0, 0]],
        ),
        (
            -3,
            [0, 0, 0, 1, 0],
            &[[0, 0, 0, 0, 1], [0, 0, 0, 0, 3], [0, 1, 1, 0, 0]],
        ),
        (
            9,
            [0, 0, 0, 1, 0],
            &[[0, 0, 0, 0, 1], [0, 0, 0, 0, 2], [0, 1, 1, 0, 1]],
        ),
        (
            2,
            [0, 0, 0, 1, 0],
            &[[0, 0, 0, 0, 0], [0, 0, 1, 0, 2], [0, 1, 0, 0, 2]],
        ),
        (
            6,
            [0, 0, 0, 1, 0],
            &[[0, 0, 0, 0, 0], [0, 0, 0, 0, 3], [0, 1, 1, 0, 1]],
        ),
        (
            -6,
            [0, 0, 0, 1, 0],
            &[[0, 0, 0, 0, 0], [0, 0, 0, 0, 2], [0, 1, 1, 0, 2]],
        ),
        (2, [0, 0, 0, 1, 1], &[[0, 0, 0, 1, 2], [0, 1, 0, 0, 2]]),
        (6, [0, 0, 0, 1, 1], &[[0, 0, 0, 0, 3], [0, 1, 0, 1, 1]]),
        (-6, [0, 0, 0, 1, 1], &[[0, 0, 0, 0, 2], [0, 1, 0, 1, 2]]),
        (1, [0, 0, 0, 2, 0], &[[0, 1, 0, 0, 2], [0, 1, 0, 0, 2]]),
        (3, [0, 0, 0, 2, 0], &[[0, 0, 0, 0, 3], [0, 2, 0, 0, 1]]),
        (-3, [0, 0, 0, 2, 0], &[[0, 0, 0, 0, 2], [0, 2, 0, 0, 2]]),
    ],
};

pub(super) const W3: Coefficient = Coefficient {
    denom: 30,
    fqq_power: 2,
    terms: &[
        (-4, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 3], [0, 0, 0, 0, 3]]),
        (3, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 2], [0, 0, 0, 0, 4]]),
    ],
};

pub(super) const W4: Coefficient = Coefficient {
    denom: 15,
    fqq_power: 2,
    terms: &[
        (-4, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 3], [1, 0, 0, 0, 2]]),
        (3, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 2], [1, 0, 0, 0, 3]]),
        (-3, [0, 0, 0, 0, 0], &[[0, 0, 0, 0, 2], [0, 0, 0, 1, 2]]),
        (
            1,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 2], [0, 0, 0, 0, 3], [0, 0, 1, 0, 0]],
        ),
        (
            3,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 2], [0, 0, 0, 0, 2], [0, 0, 1, 0, 1]],
        ),
        (
            -3,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 1], [0, 0, 0, 0, 2], [0, 0, 1, 0, 2]],
        ),
        (
            -4,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 0], [0, 0, 0, 0, 3], [0, 0, 1, 0, 2]],
        ),
        (
            3,
            [0, 0, 0, 0, 0],
            &[[0, 0, 0, 0, 0], [0, 0, 0, 0, 2], [0, 0, 1, 0, 3]],
        ),
        (-4, [0, 0, 0, 0, 1], &[[0, 0, 0, 0, 3], [0, 0, 0, 1, 2]]),
        (3, [0, 0, 0, 0, 1], &[[0, 0, 0, 0, 2], [0, 0, 0, 1, 3]]),
        (-4, [0, 0, 0, 1, 0], &[[0, 0, 0, 0, 3], [0, 1, 0, 0, 2]]),
        (3, [0, 0, 0, 1, 0], &[[0, 0, 0, 0, 2], [0, 1, 0, 0, 3]]),
    ],
};
