//! The medication workflow and the empty-language pair, shipped as text.
//!
//! `t_a` is the workflow, `t_b` a safe refinement of it, `t_c` an unsafe
//! one. `m_med` is `t_a` as a mixed system. `ce_left`/`ce_right` have empty
//! languages and do not refine each other.

use crate::model::{MixTs, Tsr};

pub const T_A: &str = include_str!("../../fixtures/t_a.tsr");
pub const T_B: &str = include_str!("../../fixtures/t_b.tsr");
pub const T_C: &str = include_str!("../../fixtures/t_c.tsr");
pub const M_MED: &str = include_str!("../../fixtures/m_med.mixts");
pub const CE_LEFT: &str = include_str!("../../fixtures/ce_left.tsr");
pub const CE_RIGHT: &str = include_str!("../../fixtures/ce_right.tsr");

fn tsr(text: &str) -> Tsr {
    super::load_tsr(text).expect("shipped fixture is valid")
}

pub fn t_a() -> Tsr {
    tsr(T_A)
}

pub fn t_b() -> Tsr {
    tsr(T_B)
}

pub fn t_c() -> Tsr {
    tsr(T_C)
}

pub fn m_med() -> MixTs {
    super::load_mixts(M_MED).expect("shipped fixture is valid")
}

pub fn ce_left() -> Tsr {
    tsr(CE_LEFT)
}

pub fn ce_right() -> Tsr {
    tsr(CE_RIGHT)
}
