//! Modular polynomials and the CM tangent (under construction).
