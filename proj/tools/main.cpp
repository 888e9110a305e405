#include "cli.hpp"

int main(int argc, char** argv) { return owl3d::cli::dispatch(argc, argv); }
