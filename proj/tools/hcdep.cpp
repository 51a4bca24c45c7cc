#include "hcdep/cli/app.hpp"

int main(int argc, char** argv) { return hcdep::cli::run_main(argc, argv); }
