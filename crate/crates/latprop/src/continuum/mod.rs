//! Continuum-limit checks: retarded Klein-Gordon reference kernels, group
//! velocities from the band structure, wave-packet transport and the
//! light-cone bound on kernel densities.

mod cone;
mod kg;
mod transport;
mod velocity;

pub use cone::{light_cone_check, LightConeReport};
pub use kg::{kg_residual, kg_retarded, kg_retarded_1p1, kg_retarded_2p1, KgDim};
pub use transport::{packet_transport_test, packet_transport_with, PacketSpec, TransportResult};
pub use velocity::{
    cartesian_momentum, group_velocity, lattice_vectors, max_component_speed, reduced_momentum, site_position,
    GroupVelocity, HEX_B_OFFSET, HEX_CONE,
};
