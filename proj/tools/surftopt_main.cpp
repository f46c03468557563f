#include "surftopt/app.hpp"

int main(int argc, char** argv) { return surftopt::run_cli(argc, argv); }
