"""Invoke tasks for linting, testing, documentation and running the shipped experiments."""

from pathlib import Path

from invoke.collection import Collection
from invoke.exceptions import Exit
from invoke.tasks import task as invoke_task

# Defaults may be overridden in invoke.yml or with INVOKE_JAMMING_DETECTOR_* environment variables
namespace = Collection("jamming_detector")
namespace.configure(
    {
        "jamming_detector": {
            "package": "jamming_detector",
            "configs_dir": str(Path(__file__).absolute().parent / "configs"),
            "workers": 1,
        }
    }
)


def task(function=None, *args, **kwargs):
    """Invoke task decorator that also registers the task in `namespace`."""

    def register(function=None):
        task_func = invoke_task(*args, **kwargs)(function) if args or kwargs else invoke_task(function)
        namespace.add_task(task_func)
        return task_func

    return register(function) if function else register


def run_command(context, command, **kwargs):
    """Wrapper to run a command locally, merging `command_env` into the environment."""
    if "command_env" in kwargs:
        kwargs["env"] = {
            **kwargs.get("env", {}),
            **kwargs.pop("command_env"),
        }
    return context.run(command, **kwargs)


# ------------------------------------------------------------------------------
# BUILD
# ------------------------------------------------------------------------------
@task(
    help={
        "check": (
            "If enabled, check for outdated dependencies in the poetry.lock file, "
            "instead of generating a new one. (default: disabled)"
        ),
    }
)
def lock(context, check=False):
    """Generate poetry.lock file."""
    command = f"poetry {'check' if check else 'lock --no-update'}"
    run_command(context, command)


# ------------------------------------------------------------------------------
# EXPERIMENTS
# ------------------------------------------------------------------------------
@task(
    help={
        "name": "Experiment configuration name inside the configs directory, without the .toml suffix.",
        "workers": "Number of worker processes, results do not depend on it.",
    }
)
def experiment(context, name, workers=0):
    """Run one experiment configuration through `jamdet evaluate`."""
    config_path = Path(context.jamming_detector.configs_dir) / f"{name}.toml"
    if not config_path.is_file():
        raise Exit(f"Experiment configuration not found: {config_path}")

    workers = workers or context.jamming_detector.workers
    run_command(context, f"jamdet evaluate --config {config_path} --workers {workers}")


@task
def experiments(context, workers=0):
    """Run every experiment configuration shipped in the configs directory."""
    for config_path in sorted(Path(context.jamming_detector.configs_dir).glob("*.toml")):
        print(f"Running experiment {config_path.stem}...")
        experiment(context, config_path.stem, workers=workers)


# ------------------------------------------------------------------------------
# DOCS
# ------------------------------------------------------------------------------
@task
def docs(context):
    """Build and serve docs locally for development."""
    print(">>> Serving Documentation at http://localhost:8001")
    run_command(context, "mkdocs serve -v")


@task
def build_and_check_docs(context):
    """Build documentation and fail on warnings."""
    command = "mkdocs build --no-directory-urls --strict"
    run_command(context, command)


@task(name="help")
def help_task(context):
    """Print the help of available tasks."""
    import tasks  # pylint: disable=all

    root = Collection.from_module(tasks)
    for task_name in sorted(root.task_names):
        print(50 * "-")
        print(f"invoke {task_name} --help")
        context.run(f"invoke {task_name} --help")


@task(
    help={
        "version": "Version of Jamming Detector to generate the release notes for.",
    }
)
def generate_release_notes(context, version=""):
    """Generate Release Notes using Towncrier."""
    command = "poetry run towncrier build"
    if version:
        command += f" --version {version}"
    else:
        command += " --version `poetry version -s`"
    context.run(command)


# ------------------------------------------------------------------------------
# TESTS
# ------------------------------------------------------------------------------
@task
def pylint(context):
    """Run pylint code analysis."""
    command = f"pylint --verbose --rcfile pyproject.toml {context.jamming_detector.package}"
    if not run_command(context, command, warn=True):
        raise Exit(code=1)


@task(aliases=("a",))
def autoformat(context):
    """Run code autoformatting."""
    ruff(context, action=["format"], fix=True)
    ruff(context, action=["lint"], fix=True)


@task(
    help={
        "action": "Available values are `['lint', 'format']`. Can be used multiple times. (default: both)",
        "target": "File or directory to inspect, repeatable (default: all files in the project will be inspected)",
        "fix": "Automatically fix selected actions. May not be able to fix all issues found. (default: False)",
        "output_format": "See https://docs.astral.sh/ruff/settings/#output-format for details. (default: `concise`)",
    },
    iterable=["action", "target"],
)
def ruff(context, action=None, target=None, fix=False, output_format="concise"):
    """Run ruff to perform code formatting and/or linting."""
    if not action:
        action = ["lint", "format"]
    if not target:
        target = ["."]

    exit_code = 0

    if "format" in action:
        command = "ruff format "
        if not fix:
            command += "--check "
        command += " ".join(target)
        if not run_command(context, command, warn=True):
            exit_code = 1

    if "lint" in action:
        command = "ruff check "
        if fix:
            command += "--fix "
        command += f"--output-format {output_format} "
        command += " ".join(target)
        if not run_command(context, command, warn=True):
            exit_code = 1

    if exit_code:
        raise Exit(code=exit_code)


@task(
    help={
        "failfast": "Fail as soon as a single test fails don't run the entire test suite. (default: False)",
        "buffer": "Discard output from passing tests. (default: True)",
        "pattern": "Run specific test methods, classes, or modules instead of all tests. (default: '')",
        "verbose": "Enable verbose test output. (default: False)",
        "acceptance": "Also run the slow statistical acceptance scenarios. (default: False)",
    }
)
def unittest(  # noqa: PLR0913
    context,
    failfast=False,
    buffer=True,
    pattern="",
    verbose=False,
    acceptance=False,
):
    """Run the unit tests under coverage."""
    command = f"coverage run --module unittest discover --start-directory {context.jamming_detector.package}/tests"
    command += " --top-level-directory ."

    if failfast:
        command += " --failfast"
    if buffer:
        command += " --buffer"
    if pattern:
        command += f" -k '{pattern}'"
    if verbose:
        command += " --verbose"

    env = {"JAMDET_ACCEPTANCE": "True" if acceptance else "False"}
    result = run_command(context, command, command_env=env, warn=True)
    if not result:
        raise Exit(code=1)


@task
def unittest_coverage(context):
    """Report on code test coverage as measured by 'invoke unittest'."""
    command = f"coverage report --skip-covered --include '{context.jamming_detector.package}/*'"

    run_command(context, command)


@task(
    help={
        "failfast": "Fail as soon as a single test fails don't run the entire test suite. (default: False)",
        "lint_only": "Only run linters; unit tests will be excluded. (default: False)",
        "acceptance": "Also run the slow statistical acceptance scenarios. (default: False)",
    }
)
def tests(context, failfast=False, lint_only=False, acceptance=False):
    """Run all tests for this package."""
    # Sorted loosely from fastest to slowest
    print("Running ruff...")
    ruff(context)
    print("Running poetry check...")
    lock(context, check=True)
    print("Running pylint...")
    pylint(context)
    print("Running mkdocs...")
    build_and_check_docs(context)
    if not lint_only:
        print("Running unit tests...")
        unittest(context, failfast=failfast, acceptance=acceptance)
        unittest_coverage(context)
    print("All tests have passed!")
