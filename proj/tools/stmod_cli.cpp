#include "stmod/cli.hpp"

int main(int argc, char** argv) { return stmod::cli::run(argc, argv); }
