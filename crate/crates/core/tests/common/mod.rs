#![allow(dead_code)]

pub mod coverage;
pub mod fixtures;
pub mod paths;
pub mod raster;
