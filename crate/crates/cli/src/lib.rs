//! Building blocks of the `symanzik` command: expression and document
//! parsing, certificate serialization, surveys and DOT export.

pub mod certjson;
pub mod document;
pub mod dot;
pub mod sexpr;
pub mod survey;
