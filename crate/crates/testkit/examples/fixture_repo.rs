//! Builds the separable fixture repository and prints its path.
fn main() {
    let repo = refscout_testkit::javagen::separable_repo(30, 8, 6);
    println!("{}", repo.keep().display());
}
