#include "photosplit/cli.hpp"

int main(int argc, char** argv) { return photosplit::cli::run(argc, argv); }
