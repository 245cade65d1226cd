import os
from os import path

PACKAGE_NAME = "capsim"


def get_user_project_path(*subdirs):
    """
    Path to `~/.capsim/<subdirs...>`, created when missing.
    """
    result_path = path.join(path.expanduser("~"), f".{PACKAGE_NAME}", *subdirs)
    os.makedirs(result_path, exist_ok=True)
    return result_path
