/// Placeholder CLI entry; returns the process exit code.
pub fn main() -> i32 {
    0
}
