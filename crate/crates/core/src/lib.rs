pub mod analysis;
pub mod augment;
pub mod error;
pub mod filtering;
pub mod image;
pub mod io;
pub mod metrics;
pub mod phantoms;
pub mod rng;
pub mod tomography;

pub use error::{Error, Result};
pub use filtering::{fbp, filter_sinogram, kab_response, ramp_response, FilterSpec, FrequencyResponse};
pub use image::{Image2D, Spacing};
pub use metrics::Mask;
pub use rng::RngStream;
pub use tomography::{backproject, crop_after_radon, pad_for_radon, radon, PadRecord, Sinogram};
