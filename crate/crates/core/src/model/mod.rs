pub mod instance;
pub mod leakage;
pub mod observation;
pub mod scheme;
pub mod set;
pub mod utility;

pub use instance::{theta_from_threshold, Instance};
pub use leakage::{sample_pattern, LeakageModel, LeakagePattern, MixtureComponent, EXACT_SUPPORT_CAP};
pub use observation::{consistent, Observation};
pub use scheme::{parse_profile, set_to_profile, Alphabet, PrefixScheme, Profile, SignalingScheme};
pub use set::{k_subsets, ReceiverSet};
pub use utility::UtilityFunction;
