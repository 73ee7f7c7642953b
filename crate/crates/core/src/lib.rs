pub mod surface_models;
pub mod domains;
pub mod spaces;
pub mod boundary_transmission;
pub mod linalg;
pub mod schiffer_ops;
pub mod jump;
