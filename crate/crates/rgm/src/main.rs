// SPDX-License-Identifier: Apache-2.0

use std::process::ExitCode;

use rgm::cli::{main_with, Outcome};

fn main() -> ExitCode {
    match main_with(std::env::args_os()) {
        Ok(Outcome::Planned(names)) => {
            for n in names {
                println!("{n}");
            }
            ExitCode::SUCCESS
        }
        Ok(Outcome::Written(m)) => {
            eprintln!("wrote {} artifacts", m.artifacts.len());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}] {}", e.category(), e);
            ExitCode::FAILURE
        }
    }
}
