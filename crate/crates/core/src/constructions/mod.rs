//! The two explicit constructions: the even-tuple system `E_α` and the
//! free-abelian G-set apparatus.

pub mod bergman;
pub mod henkin;

pub use bergman::{
    bergman_demo, coset_equal, d_map, gset_bond, h_subgroup_member, random_element,
    random_relator_combination, BergmanError, CosetElement, DemoLedger, DemoStep, FreeAbElement,
    Generator, HSubgroup,
};
pub use henkin::{
    cofinal_extract, family_by_lifting, family_from_top, format_tuple, henkin_enumerate,
    henkin_eps, henkin_lift, henkin_member, henkin_system, same_length_ending_violation,
    same_length_level_violation, HenkinError, HenkinTuple,
};
