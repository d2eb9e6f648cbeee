// SPDX-License-Identifier: Apache-2.0

//! File formats, run configuration and the `rgm` command line on top of
//! `rgm-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod io;
pub mod manifest;
