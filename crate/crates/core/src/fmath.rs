//! Thin wrappers over `libm` so the crate builds without `std`.
//!
//! `round` follows C `round` semantics: halfway cases away from zero.

#![allow(dead_code)]

pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

pub(crate) fn roundf(x: f32) -> f32 {
    libm::roundf(x)
}

pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

pub(crate) fn ceilf(x: f32) -> f32 {
    libm::ceilf(x)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

pub(crate) fn absf(x: f32) -> f32 {
    libm::fabsf(x)
}
