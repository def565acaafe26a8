pub mod converge;
pub mod oracle;
pub mod trajectory;
pub mod verify;
