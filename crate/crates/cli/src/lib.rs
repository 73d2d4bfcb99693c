//! Command-line tool and HTTP service for the Robber Locating game.

pub mod cli;
pub mod server;
pub mod session;
