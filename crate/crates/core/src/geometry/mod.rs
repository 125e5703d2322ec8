//! Raster-based diagnostics of attractor geometry.

pub mod boxcount;
pub mod probes;
pub mod raster;

pub use boxcount::{box_counting_dimension, boundary_box_dimension, dyadic_scales, DimensionFit};
pub use probes::{
    aikawa_integral_probe, dt_class_probe, osc_and_overlap_probe, porosity_probe, IntegralProbeOptions,
    OscReport, PorosityReport, TrendReport, Verdict,
};
pub use raster::{measure_from_raster, rasterize_attractor, rasterize_ifs, raster_measure, MeasureEstimate, PixelClass, RasterImage};
