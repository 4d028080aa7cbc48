//! Boundary layer operators (implementation follows).
