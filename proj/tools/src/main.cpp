#include "mvbeta_cli/cli.hpp"

int main(int argc, char** argv) { return mvbeta::cli::dispatch(argc, argv); }
