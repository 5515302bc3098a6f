//! Worked models: sudden box expansion, photon counting, a recoiling
//! beamsplitter, and a superposed source mass.

pub mod beamsplitter;
pub mod box_expansion;
pub mod equivalence;
pub mod photon;

pub use beamsplitter::{coherent_overlap, run_beamsplitter, BeamsplitterRun, BeamsplitterSpec};
pub use box_expansion::{box_overlap, run_box_expansion, run_box_expansion_to, BoxExpansionRun, BoxExpansionSpec};
pub use equivalence::{run_equivalence, EquivalenceRun, EquivalenceSpec};
pub use photon::{build_photon_counter, run_photon_counting, PhotonCountingRun, PhotonCountingSpec};

/// Complex numbers as `[re, im]` pairs.
pub mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn to_pair(z: &Complex64) -> [f64; 2] {
        [z.re, z.im]
    }

    pub fn from_pair(p: [f64; 2]) -> Complex64 {
        Complex64::new(p[0], p[1])
    }

    pub mod scalar {
        use super::*;

        pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
            to_pair(z).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
            <[f64; 2]>::deserialize(d).map(from_pair)
        }
    }

    pub mod pair {
        use super::*;

        pub fn serialize<S: Serializer>(z: &(Complex64, Complex64), s: S) -> Result<S::Ok, S::Error> {
            [to_pair(&z.0), to_pair(&z.1)].serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(Complex64, Complex64), D::Error> {
            <[[f64; 2]; 2]>::deserialize(d).map(|[a, b]| (from_pair(a), from_pair(b)))
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(z: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
            z.iter().map(to_pair).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
            Vec::<[f64; 2]>::deserialize(d).map(|v| v.into_iter().map(from_pair).collect())
        }
    }
}
