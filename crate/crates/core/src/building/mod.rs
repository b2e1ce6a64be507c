//! Flags, frames, one-parameter subgroups and apartments: the extended Tits
//! building of GL(r), SL(r) and Sp(2r).

pub mod apartment;
pub mod flag;
pub mod group;
pub mod onepar;
pub mod oracle;

pub use apartment::{common_frame, common_frame_with_budget, ApartmentVerdict, SubspaceLattice};
pub use flag::{flag_of_weights, is_adapted, Flag, Frame, LabeledFlag};
pub use group::{
    is_isotropic_flag, is_normal_basis, symmetric_labels_ok, symplectic_complement, GroupKind, GroupSpec,
    SymplecticForm,
};
pub use onepar::{
    class_of, equivalent, in_parabolic, in_parabolic_via_limit, one_param_of, LaurentPoly, OnePS,
    ParabolicDescriptor,
};
pub use oracle::FrameOracle;
