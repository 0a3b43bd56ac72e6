pub mod geom;
pub mod gf;
pub mod lring;
pub mod motivic;
pub mod params;
pub mod yfy;
