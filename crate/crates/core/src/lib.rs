pub mod algebra;
pub mod diffring;
pub mod motzkin;
pub mod stringpoly;
pub mod phipsi;
pub mod specialize;
pub mod genfun;
pub mod solver;
pub mod maps;
