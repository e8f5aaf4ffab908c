pub mod frontend;
pub mod instance;
pub mod mapping;
pub mod migrate;
pub mod presentation;
pub mod schema;
