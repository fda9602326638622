//! Supersingular reduction (under construction).
