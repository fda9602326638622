//! Quaternionic Brandt-module machinery (under construction).
